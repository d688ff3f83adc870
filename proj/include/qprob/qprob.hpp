#pragma once

// Everything except the JSON layer (qprob/report.hpp).
#include "qprob/adams.hpp"
#include "qprob/algebra.hpp"
#include "qprob/bounds.hpp"
#include "qprob/certify.hpp"
#include "qprob/errors.hpp"
#include "qprob/interval.hpp"
#include "qprob/io.hpp"
#include "qprob/network.hpp"
#include "qprob/oracle.hpp"
#include "qprob/partition.hpp"
#include "qprob/tables.hpp"

#pragma once

#include "qcorr/correlations.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/lhv.hpp"
#include "qcorr/operator_core.hpp"
#include "qcorr/quasiprob.hpp"
#include "qcorr/random.hpp"
#include "qcorr/states.hpp"

#pragma once

#include "shorprob/bounds.hpp"
#include "shorprob/error.hpp"
#include "shorprob/fft.hpp"
#include "shorprob/kahan.hpp"
#include "shorprob/modular.hpp"
#include "shorprob/oracle.hpp"
#include "shorprob/quadrature.hpp"
#include "shorprob/shor_state.hpp"

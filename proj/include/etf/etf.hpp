#pragma once

#include "etf/error.hpp"
#include "etf/operator.hpp"
#include "etf/projection.hpp"
#include "etf/frame.hpp"
#include "etf/ellipsoid.hpp"
#include "etf/synthesis.hpp"
#include "etf/diag_stream.hpp"

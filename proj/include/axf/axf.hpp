#pragma once

#include "axf/diagnostics.hpp"
#include "axf/evaluator.hpp"
#include "axf/logic.hpp"
#include "axf/parser.hpp"
#include "axf/report.hpp"
#include "axf/state.hpp"
#include "axf/transformer.hpp"
#include "axf/verifier.hpp"

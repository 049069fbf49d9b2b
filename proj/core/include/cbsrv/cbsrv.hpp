#pragma once

#include "cbsrv/bisim.hpp"
#include "cbsrv/builtin.hpp"
#include "cbsrv/engine.hpp"
#include "cbsrv/error.hpp"
#include "cbsrv/expr.hpp"
#include "cbsrv/model.hpp"
#include "cbsrv/model_io.hpp"
#include "cbsrv/monitor.hpp"
#include "cbsrv/rgt.hpp"
#include "cbsrv/semantics.hpp"
#include "cbsrv/state.hpp"
#include "cbsrv/trace_io.hpp"
#include "cbsrv/transform.hpp"
#include "cbsrv/witness.hpp"

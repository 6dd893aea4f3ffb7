#pragma once

#include "output_sets.hpp"
#include "patterns.hpp"
#include "program.hpp"
#include "algorithms.hpp"
#include "kernel.hpp"
#include "trace_io.hpp"
#include "checker.hpp"
#include "run_spec.hpp"

#pragma once

#include "netred/analysis.hpp"
#include "netred/errors.hpp"
#include "netred/graph.hpp"
#include "netred/gramsolve.hpp"
#include "netred/io.hpp"
#include "netred/linalg.hpp"
#include "netred/reduction.hpp"
#include "netred/simplex.hpp"
#include "netred/sysmodel.hpp"

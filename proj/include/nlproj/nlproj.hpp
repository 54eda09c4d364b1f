#pragma once

/// @file nlproj.hpp Convenience include for the whole library.

#include "nlproj/adjoint.hpp"
#include "nlproj/bench.hpp"
#include "nlproj/core.hpp"
#include "nlproj/cp_solver.hpp"
#include "nlproj/family.hpp"
#include "nlproj/instance_gen.hpp"
#include "nlproj/metrics.hpp"
#include "nlproj/mlp.hpp"
#include "nlproj/oracle.hpp"
#include "nlproj/precondition.hpp"
#include "nlproj/projection.hpp"
#include "nlproj/serialize.hpp"
#include "nlproj/soc.hpp"
#include "nlproj/trainer.hpp"
#include "nlproj/types.hpp"

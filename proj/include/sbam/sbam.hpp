#pragma once

#include "sbam/constraints.hpp"
#include "sbam/demonstration.hpp"
#include "sbam/error.hpp"
#include "sbam/executor.hpp"
#include "sbam/geometry.hpp"
#include "sbam/json_io.hpp"
#include "sbam/kinematics.hpp"
#include "sbam/learning.hpp"
#include "sbam/optimizer.hpp"
#include "sbam/pipeline.hpp"
#include "sbam/segmentation.hpp"
#include "sbam/signal.hpp"
#include "sbam/synth.hpp"

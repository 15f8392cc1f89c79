#pragma once

// Umbrella header for the whole library.

#include "signbench/adam.hpp"
#include "signbench/balance.hpp"
#include "signbench/config.hpp"
#include "signbench/data_source.hpp"
#include "signbench/error.hpp"
#include "signbench/image.hpp"
#include "signbench/image_codec.hpp"
#include "signbench/label_map.hpp"
#include "signbench/loss.hpp"
#include "signbench/manifest.hpp"
#include "signbench/metrics.hpp"
#include "signbench/model.hpp"
#include "signbench/nn.hpp"
#include "signbench/plot.hpp"
#include "signbench/preprocess.hpp"
#include "signbench/report.hpp"
#include "signbench/rng.hpp"
#include "signbench/schedule.hpp"
#include "signbench/sha256.hpp"
#include "signbench/split.hpp"
#include "signbench/synthetic.hpp"
#include "signbench/tensor.hpp"
#include "signbench/trainer.hpp"

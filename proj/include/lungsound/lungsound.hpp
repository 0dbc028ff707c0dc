#pragma once

// Umbrella header for the lungsound toolkit: WAV + annotation ingestion,
// log-mel / MFCC feature images, a frozen convolutional extractor with a
// trainable softmax head, and patient-disjoint cross-validated evaluation.

#include "lungsound/cache.hpp"
#include "lungsound/cli.hpp"
#include "lungsound/common.hpp"
#include "lungsound/config.hpp"
#include "lungsound/dataset.hpp"
#include "lungsound/dsp.hpp"
#include "lungsound/eval.hpp"
#include "lungsound/imaging.hpp"
#include "lungsound/model.hpp"
#include "lungsound/pipeline.hpp"
#include "lungsound/synth.hpp"
#include "lungsound/wav.hpp"

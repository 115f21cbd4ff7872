#pragma once
// Umbrella header: pulls in the whole gemkit library.
#include "classify.hpp"
#include "cli.hpp"
#include "corpus.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "records.hpp"
#include "reports.hpp"
#include "segmentation.hpp"
#include "spectral.hpp"
#include "stats.hpp"
#include "synth.hpp"
#include "types.hpp"
#include "wav.hpp"

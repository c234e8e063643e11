#pragma once

#include "twostage/bundle.hpp"
#include "twostage/corners.hpp"
#include "twostage/editdist.hpp"
#include "twostage/ensemble.hpp"
#include "twostage/error.hpp"
#include "twostage/features.hpp"
#include "twostage/image.hpp"
#include "twostage/mlp.hpp"
#include "twostage/pgm.hpp"
#include "twostage/pipeline.hpp"
#include "twostage/preprocess.hpp"
#include "twostage/report.hpp"
#include "twostage/synth.hpp"

#pragma once

#include "adadif/bounds.hpp"
#include "adadif/dataset.hpp"
#include "adadif/diffusion.hpp"
#include "adadif/errors.hpp"
#include "adadif/experiment.hpp"
#include "adadif/graph.hpp"
#include "adadif/labels.hpp"
#include "adadif/metrics.hpp"
#include "adadif/optim.hpp"
#include "adadif/random.hpp"
#include "adadif/robust.hpp"
#include "adadif/sampling.hpp"
#include "adadif/spectral.hpp"
#include "adadif/walks.hpp"

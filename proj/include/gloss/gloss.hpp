#pragma once

#include "gloss/corpus.hpp"
#include "gloss/decoder.hpp"
#include "gloss/eval.hpp"
#include "gloss/genlab.hpp"
#include "gloss/latent.hpp"
#include "gloss/linalg.hpp"
#include "gloss/optim.hpp"
#include "gloss/persistence.hpp"
#include "gloss/trainer.hpp"

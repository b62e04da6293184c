// Umbrella header for the whole library.
#pragma once

#include "spgc/bench.hpp"
#include "spgc/canonical.hpp"
#include "spgc/circuit.hpp"
#include "spgc/circuit_build.hpp"
#include "spgc/circuit_sample.hpp"
#include "spgc/dataset_io.hpp"
#include "spgc/error.hpp"
#include "spgc/graph.hpp"
#include "spgc/layout.hpp"
#include "spgc/metrics.hpp"
#include "spgc/model.hpp"
#include "spgc/numeric.hpp"
#include "spgc/rng.hpp"
#include "spgc/sampler.hpp"
#include "spgc/serialize.hpp"
#include "spgc/smiles.hpp"
#include "spgc/trainer.hpp"

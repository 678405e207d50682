#pragma once

#include "nlcl/grid.hpp"
#include "nlcl/fft.hpp"
#include "nlcl/symbols.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/model.hpp"
#include "nlcl/norms.hpp"
#include "nlcl/random_field.hpp"
#include "nlcl/inequalities.hpp"
#include "nlcl/greens.hpp"
#include "nlcl/solver.hpp"
#include "nlcl/decay.hpp"
#include "nlcl/io.hpp"
#include "nlcl/config.hpp"
#include "nlcl/cli.hpp"

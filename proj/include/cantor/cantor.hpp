#pragma once

#include "cantor/builders.hpp"
#include "cantor/chain.hpp"
#include "cantor/chain_io.hpp"
#include "cantor/chain_ops.hpp"
#include "cantor/errors.hpp"
#include "cantor/farber.hpp"
#include "cantor/finite_image.hpp"
#include "cantor/holonomy.hpp"
#include "cantor/lcs.hpp"
#include "cantor/mealy.hpp"
#include "cantor/parallel.hpp"
#include "cantor/rational.hpp"
#include "cantor/word.hpp"

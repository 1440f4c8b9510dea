#pragma once

// Everything at once.

#include "acceptance.hpp"
#include "ball_function.hpp"
#include "bt_tree.hpp"
#include "characters.hpp"
#include "combinatorics.hpp"
#include "cvalue.hpp"
#include "elliptic.hpp"
#include "linalg.hpp"
#include "local_dist.hpp"
#include "measure.hpp"
#include "modsym.hpp"
#include "mtt.hpp"
#include "numeric.hpp"
#include "padic.hpp"
#include "steinberg.hpp"
#include "tree_rep.hpp"

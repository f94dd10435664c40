#ifndef MARKOVTREE_MARKOVTREE_HPP
#define MARKOVTREE_MARKOVTREE_HPP

#include "core.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "measure.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "scalar.hpp"
#include "trees.hpp"

#endif // MARKOVTREE_MARKOVTREE_HPP

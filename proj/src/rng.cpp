#include "matchbench/rng.hpp"

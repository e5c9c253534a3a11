// Convenience header pulling in the whole library.
#pragma once

#include "dfsmbqc/core.hpp"
#include "dfsmbqc/cluster.hpp"
#include "dfsmbqc/noise.hpp"
#include "dfsmbqc/mbqc.hpp"
#include "dfsmbqc/dfs3.hpp"
#include "dfsmbqc/tomography.hpp"
#include "dfsmbqc/io.hpp"

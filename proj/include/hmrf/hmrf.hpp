#ifndef HMRF_HMRF_HPP
#define HMRF_HMRF_HPP

#include "hmrf/edges.hpp"
#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"
#include "hmrf/hmrf_em.hpp"
#include "hmrf/image.hpp"
#include "hmrf/io.hpp"
#include "hmrf/kmeans.hpp"
#include "hmrf/mrf_map.hpp"
#include "hmrf/pipeline.hpp"

#endif  // HMRF_HMRF_HPP

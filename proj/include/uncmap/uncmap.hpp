#pragma once

// Everything except the HTTP layer (uncmap/api.hpp), which pulls in cpp-httplib.

#include "uncmap/classifiers/classifier.hpp"
#include "uncmap/dataset.hpp"
#include "uncmap/error.hpp"
#include "uncmap/evidential.hpp"
#include "uncmap/gridmap.hpp"
#include "uncmap/heatmap.hpp"
#include "uncmap/measures.hpp"
#include "uncmap/probability.hpp"
#include "uncmap/projection.hpp"

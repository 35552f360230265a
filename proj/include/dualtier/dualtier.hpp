#pragma once

// Umbrella header for the dual-tier adaptive intrusion-detection library.

#include "dualtier/blob_io.hpp"
#include "dualtier/cache.hpp"
#include "dualtier/clusters.hpp"
#include "dualtier/common.hpp"
#include "dualtier/config.hpp"
#include "dualtier/crossval.hpp"
#include "dualtier/csv.hpp"
#include "dualtier/dbscan.hpp"
#include "dualtier/detector.hpp"
#include "dualtier/dpc.hpp"
#include "dualtier/encoding.hpp"
#include "dualtier/folds.hpp"
#include "dualtier/forest.hpp"
#include "dualtier/iforest.hpp"
#include "dualtier/io.hpp"
#include "dualtier/lof.hpp"
#include "dualtier/matrix.hpp"
#include "dualtier/metrics.hpp"
#include "dualtier/normalize.hpp"
#include "dualtier/pipeline.hpp"
#include "dualtier/prepare.hpp"
#include "dualtier/report.hpp"
#include "dualtier/scenario.hpp"
#include "dualtier/simulate.hpp"

#pragma once

#include "coderec/corpus.hpp"
#include "coderec/embedder.hpp"
#include "coderec/error.hpp"
#include "coderec/evaluation.hpp"
#include "coderec/html.hpp"
#include "coderec/index_files.hpp"
#include "coderec/neighbors.hpp"
#include "coderec/projection.hpp"
#include "coderec/qa_index.hpp"
#include "coderec/rh_index.hpp"
#include "coderec/timing.hpp"
#include "coderec/vector_store.hpp"

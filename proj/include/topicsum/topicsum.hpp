#pragma once

#include "topicsum/corpus.hpp"
#include "topicsum/error.hpp"
#include "topicsum/extractive.hpp"
#include "topicsum/html_text.hpp"
#include "topicsum/lda.hpp"
#include "topicsum/linalg.hpp"
#include "topicsum/lsa.hpp"
#include "topicsum/pipeline.hpp"
#include "topicsum/porter.hpp"
#include "topicsum/rouge.hpp"
#include "topicsum/text.hpp"
#include "topicsum/vis.hpp"
#include "topicsum/visdata_schema.hpp"

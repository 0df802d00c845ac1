#pragma once

#include "pwqc/corpus.hpp"
#include "pwqc/harness.hpp"
#include "pwqc/metrics.hpp"
#include "pwqc/parser.hpp"
#include "pwqc/report.hpp"
#include "pwqc/schema.hpp"
#include "pwqc/semantics.hpp"

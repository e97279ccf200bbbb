#pragma once

#include "sanscan/attack_gen.hpp"
#include "sanscan/browser_model.hpp"
#include "sanscan/config.hpp"
#include "sanscan/context.hpp"
#include "sanscan/errors.hpp"
#include "sanscan/evaluator.hpp"
#include "sanscan/html_scanner.hpp"
#include "sanscan/js_parser.hpp"
#include "sanscan/path_extractor.hpp"
#include "sanscan/report_json.hpp"
#include "sanscan/sanitizers.hpp"
#include "sanscan/template_doc.hpp"
#include "sanscan/transduction.hpp"
#include "sanscan/version.hpp"

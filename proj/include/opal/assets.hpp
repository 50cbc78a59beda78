#pragma once

// Opal sources compiled into the library.

namespace opal::assets {

extern const char* const prelude;
extern const char* const fix;
extern const char* const bench_city_excursions;
extern const char* const bench_fact_check;
extern const char* const bench_tree_search;
extern const char* const bench_tts;

}  // namespace opal::assets

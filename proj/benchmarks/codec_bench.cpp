#include "wapshop/session.hpp"
#include "wapshop/storefront.hpp"
#include "wapshop/wbxml.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace wapshop;

namespace {

wml::Deck product_deck() {
  auto store = shop::Store::from_fixture(std::filesystem::path(WAPSHOP_DATA_DIR) / "seed_catalog.json");
  session::SessionRegistry sessions;
  storefront::Storefront front(store, sessions);
  return front.render_page(storefront::Route::parse("/product?id=p3"), shop::system_now());
}

void BM_Serialize(benchmark::State& state) {
  const auto deck = product_deck();
  for (auto _ : state) benchmark::DoNotOptimize(wml::serialize_deck(deck));
}
BENCHMARK(BM_Serialize);

void BM_Parse(benchmark::State& state) {
  const auto text = wml::serialize_deck(product_deck());
  for (auto _ : state) benchmark::DoNotOptimize(wml::parse_deck(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse);

void BM_Compile(benchmark::State& state) {
  const auto deck = product_deck();
  for (auto _ : state) benchmark::DoNotOptimize(wbxml::compile_deck(deck));
}
BENCHMARK(BM_Compile);

void BM_Decompile(benchmark::State& state) {
  const auto bytes = wbxml::compile_deck(product_deck()).bytes;
  for (auto _ : state) benchmark::DoNotOptimize(wbxml::decompile_deck(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_Decompile);

}  // namespace

// Writes the fixture corpus used by the tests into a directory.
#include <iostream>

#include "fixture_corpus.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture_corpus <dir>\n";
    return 2;
  }
  for (const auto& id : capcorpus::testing::write_fixture_corpus(argv[1])) std::cout << id << "\n";
  return 0;
}

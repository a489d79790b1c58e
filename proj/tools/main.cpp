#include <CLI11.hpp>
#include <iostream>

#include "clab/error.hpp"
#include "run_config.hpp"

namespace {

int exit_code(clab::ErrorClass c) {
  switch (c) {
    case clab::ErrorClass::Usage: return 2;
    case clab::ErrorClass::Io: return 3;
    case clab::ErrorClass::Model: return 4;
  }
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  clab::cli::RunConfig cfg;
  clab::cli::Parser parser(cfg);
  try {
    parser.app().parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return parser.app().exit(e) == 0 ? 0 : 2;
  }
  try {
    parser.finalize();
    return clab::cli::run_command(cfg);
  } catch (const clab::Error& e) {
    std::cerr << "contagion-lab: " << e.what() << '\n';
    return exit_code(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "contagion-lab: " << e.what() << '\n';
    return 4;
  }
}

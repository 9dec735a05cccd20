#include "psomle/cli.hpp"

int main(int argc, char** argv) {
  return psomle::cli::run(argc, argv);
}

#include "vergm/cli.hpp"

int main(int argc, char** argv) { return vergm::cli::dispatch(argc, argv); }

#include "srf/harness.hpp"

int main(int argc, char** argv) { return srf::run_command(argc, argv); }

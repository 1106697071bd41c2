#include "sattree/harness.hpp"

int main(int argc, char** argv) { return sattree::run_cli(argc, argv); }

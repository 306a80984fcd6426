#include "thermalrabi/cli.hpp"

int main(int argc, char** argv) { return thermalrabi::run_cli(argc, argv); }

#include "colsched/cli.hpp"

int main(int argc, char** argv) { return colsched::run_cli(argc, argv); }

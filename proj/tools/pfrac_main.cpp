#include "pfrac/app.hpp"

int main(int argc, char** argv) { return pfrac::run_cli(argc, argv); }

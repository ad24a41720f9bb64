#include "vessel/study/run.hpp"

int main(int argc, char** argv) { return vessel::study::run_study(argc, argv); }

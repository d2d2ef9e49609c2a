int run_05(const int *a, int n) {
    return n;
}

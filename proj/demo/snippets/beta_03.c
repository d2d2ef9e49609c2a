int run_03(const int *a, int n) {
    if (n > 0) {
        n--;
    }
    for (int i = 0; i < n; i++) {
        if (a[i] < 0 && i > 1) {
            n++;
        }
    }
    return n;
}

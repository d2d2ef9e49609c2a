class S06 {
    int run(int[] a) {
        if (a.length > 0) {
            a[0]++;
        }
        return a.length;
    }
}

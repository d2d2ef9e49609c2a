class S03 {
    int run(int[] a) {
        if (a.length > 0) {
            a[0]++;
        }
        for (int i = 0; i < a.length; i++) {
            if (a[i] < 0 && i > 1) {
                a[i] = 0;
            }
        }
        return a.length;
    }
}

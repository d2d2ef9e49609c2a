function run06(a) {
    if (a.length > 0) {
        a.pop();
    }
    return a.length;
}

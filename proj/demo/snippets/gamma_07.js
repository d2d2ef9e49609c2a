function run07(a) {
    if (a.length > 0) {
        a.pop();
    }
    for (const x of a) {
        if (x < 0 && a.length > 1) {
            a.push(0);
        }
    }
    return a.length;
}

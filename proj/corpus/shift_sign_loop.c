int main(void) {
  int x = __VERIFIER_nondet_int();
  int s;
  int k = 0;
  assume(x > -50 && x < 50);
  while (k < 16) {
    s = x >> 31;
    if (s == -1) {
      x = x + 3;
    } else {
      x = x - 2;
    }
    k++;
  }
  return 0;
}

int main(void) {
  int n = __VERIFIER_nondet_int();
  int g;
  int i = 0;
  assume(n >= 0 && n < 64);
  while (i < n) {
    g = i ^ (i >> 1);
    i++;
  }
  return 0;
}

int main(void) {
  int x = __VERIFIER_nondet_int();
  int y;
  int n = 0;
  assume(x >= 0 && x < 100);
  while (n < 10) {
    y = ~x;
    x = -y;
    n++;
  }
  return 0;
}

int main(void) {
  int a = __VERIFIER_nondet_int();
  int b = __VERIFIER_nondet_int();
  int c;
  int i = 0;
  assume(a >= 0);
  while (i < 5) {
    c = a & b;
    b = b - 7;
    a = c + i;
    i++;
  }
  return 0;
}

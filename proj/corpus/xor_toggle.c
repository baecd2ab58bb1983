int main(void) {
  int state = 0;
  int t = __VERIFIER_nondet_int();
  int i = 0;
  assume(t >= 0 && t < 32);
  while (i < t) {
    state = state ^ 1;
    i++;
  }
  assert(state == 0 || state == 1);
  return 0;
}

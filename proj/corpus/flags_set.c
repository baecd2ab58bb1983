int main(void) {
  int flags = 0;
  int req = __VERIFIER_nondet_int();
  int i = 0;
  assume(req >= 0 && req < 256);
  while (i < 8) {
    if ((req & 1) == 1) {
      flags = flags | 16;
    }
    req = req >> 1;
    i++;
  }
  assert(flags >= 0);
  return 0;
}

float r, v[100];
int main() {
  r = v[3+XPLUS_NP];
  return 0;
}

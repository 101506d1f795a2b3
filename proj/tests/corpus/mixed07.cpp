struct Node { int key; float val; Node* next; };
Node a, b;
int main() {
  Node* p;
  a.key = 1; a.val = 1.0f; a.next = &b;
  b.key = 2; b.val = 2.0f; b.next = 0;
  p = &a;
  p->next->val = p->val + 3.0f;
  return p->next->key;
}

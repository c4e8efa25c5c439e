#include "itwlab/itwlab.h"

/* compiled as C to pin the header to C linkage */
const char* itwlab_compat_probe(void) { return itwlab_version(); }

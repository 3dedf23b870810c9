import { PortalClient } from './api.js';
import { buildUi } from './ui.js';

const client = new PortalClient('');
const ui = buildUi(document, client);
document.getElementById('app')?.appendChild(ui.root);

client
  .health()
  .then((h) => {
    const badge = document.getElementById('health');
    if (badge) badge.textContent = `model ${h.model_version} · ${h.gallery_size} enrolled`;
  })
  .catch(() => {
    const badge = document.getElementById('health');
    if (badge) badge.textContent = 'service unreachable';
  });

/** Landing page bootstrap: consent gate, email form, share affordances. */

import { ApiClient } from "./api.js";
import { buildShareContent } from "./share.js";
import {
  LandingViewModel,
  canSubmit,
  initialViewModel,
  submitEmail,
} from "./landing.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function wireLanding(api = new ApiClient("")): void {
  let vm: LandingViewModel = initialViewModel();

  const consent = el<HTMLInputElement>("consent");
  const email = el<HTMLInputElement>("email");
  const submit = el<HTMLButtonElement>("submit");
  const banner = el<HTMLDivElement>("error-banner");
  const result = el<HTMLDivElement>("share-result");

  const render = () => {
    submit.disabled = !canSubmit(vm);
    banner.textContent = vm.errorBanner ?? "";
    banner.style.display = vm.errorBanner ? "block" : "none";
    submit.textContent = vm.retryable ? "Retry" : "Get my unique link";
    result.style.display = vm.issuedShareUrl ? "block" : "none";
    if (vm.issuedShareUrl) {
      const share = buildShareContent(vm.issuedShareUrl);
      el<HTMLInputElement>("share-url").value = share.shareUrl;
      el<HTMLAnchorElement>("share-twitter").href = share.twitterUrl;
      el<HTMLAnchorElement>("share-facebook").href = share.facebookUrl;
      el<HTMLAnchorElement>("share-email").href = share.mailtoUrl;
    }
  };

  consent.addEventListener("change", () => {
    vm = { ...vm, consentGiven: consent.checked };
    render();
  });
  email.addEventListener("input", () => {
    vm = { ...vm, emailInput: email.value };
    render();
  });
  el<HTMLFormElement>("link-form").addEventListener("submit", async (evt) => {
    evt.preventDefault();
    submit.disabled = true;
    vm = await submitEmail(api, vm);
    render();
  });
  el<HTMLButtonElement>("copy-button").addEventListener("click", async () => {
    if (vm.issuedShareUrl) {
      await navigator.clipboard.writeText(buildShareContent(vm.issuedShareUrl).copyText);
      el<HTMLButtonElement>("copy-button").textContent = "Copied!";
    }
  });

  render();
}

if (typeof document !== "undefined" && document.getElementById("link-form")) {
  wireLanding();
}

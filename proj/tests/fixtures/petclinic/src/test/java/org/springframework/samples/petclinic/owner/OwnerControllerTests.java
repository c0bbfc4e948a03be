package org.springframework.samples.petclinic.owner;

import org.junit.Test;

public class OwnerControllerTests {

    @Test
    public void testInitCreationForm() throws Exception {
        if (System.nanoTime() > 0 && System.nanoTime() < 0) {
            throw new IllegalStateException();
        }
    }
}
